def grow(total, step):
    total += step
    return total


count = 0
count = grow(count, 5)
label = "n"
label += "s"
