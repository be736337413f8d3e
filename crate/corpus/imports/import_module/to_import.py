CONSTANT = 42


def helper(x):
    return str(x)
