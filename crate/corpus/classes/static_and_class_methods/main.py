class Shape:
    @staticmethod
    def describe(name):
        return name.title()

    @classmethod
    def create(cls):
        return cls()


label = Shape.describe("square")
shape = Shape.create()
