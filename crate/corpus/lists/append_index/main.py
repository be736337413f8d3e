def build(count):
    items = []
    for i in range(count):
        items.append(i * 1.5)
    return items


values = build(3)
first = values[0]
