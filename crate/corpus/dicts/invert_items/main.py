def invert(mapping):
    flipped = {v: k for k, v in mapping.items()}
    return flipped


original = {"one": 1}
inverse = invert(original)
pairs = list(inverse.items())
first_key = pairs[0][0]
