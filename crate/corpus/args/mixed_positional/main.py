def describe(count, label, ratio):
    text = label * count
    scaled = ratio * count
    return text


out = describe(2, "ab", 0.5)
other = describe(1, "c", 1.5)
