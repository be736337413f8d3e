def head(seq, n):
    part = seq[:n]
    return part


letters = head(["a", "b", "c"], 2)
word = head("hello", 3)
