import extlib


def build(size):
    widget = extlib.make_widget(size)
    return widget


item = build(3)
area = item.area()
