class Base:
    def who(self):
        return "base"


class Left(Base):
    def who(self):
        return 1


class Right(Base):
    def who(self):
        return 2.0


class Child(Left, Right):
    pass


def ask(item):
    reply = item.who()
    return reply


obj = Child()
answer = ask(obj)
