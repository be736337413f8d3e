def apply_all(fn, items):
    mapped = list(map(fn, items))
    return mapped


squares = apply_all(lambda n: n * n, [1, 2])
key_fn = lambda pair: pair[1]
ordered = sorted([(1, "b"), (2, "a")], key=key_fn)
