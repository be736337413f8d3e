def parse(text):
    value = int(text)
    return value


number = parse("42")
flag = bool(number)
as_float = float(number)
