def shout(word):
    upper = word.upper()
    parts = upper.split("A")
    return parts


pieces = shout("banana")
joined = "-".join(pieces)
encoded = joined.encode()
