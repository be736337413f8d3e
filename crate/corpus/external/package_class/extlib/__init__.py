class Widget:
    def __init__(self, size):
        self.size = size

    def area(self):
        return self.size * self.size


def make_widget(size):
    return Widget(size)
