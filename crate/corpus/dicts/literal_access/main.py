def lookup(table, key):
    found = table[key]
    return found


scores = {"a": 1, "b": 2}
val = lookup(scores, "a")
keys = list(scores)
