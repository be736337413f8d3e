class Parent:
    def __init__(self, name):
        self.name = name

    def label(self):
        return self.name


class Kid(Parent):
    def __init__(self, name, age):
        super().__init__(name)
        self.age = age

    def label(self):
        base = super().label()
        return base + "!"


kid = Kid("sam", 5)
tag = kid.label()
