def collect(**options):
    names = sorted(options)
    return names


keys = collect(a=1, b="two")
