def summarize(items):
    size = len(items)
    ordered = sorted(items)
    return ordered


result = summarize((3, 1, 2))
reference = len
