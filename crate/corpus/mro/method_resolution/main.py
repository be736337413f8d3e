class A:
    def value(self):
        return 1


class B(A):
    pass


class C(B):
    def value(self):
        parent = super().value()
        return parent * 0.5


def read(obj):
    return obj.value()


plain = read(B())
derived = read(C())
