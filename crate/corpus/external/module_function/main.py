from extlib import mathx


def run(value):
    scaled = mathx.scale(value)
    return scaled


out = run(1.5)
module = mathx
