from helpers import twice as double


def compute(base):
    doubled = double(base)
    return doubled


answer = compute(21)
fn = double
