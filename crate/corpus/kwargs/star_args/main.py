def total(*numbers, start=0):
    acc = start
    for num in numbers:
        acc = acc + num
    return acc


whole = total(1, 2, 3)
mixed = total(1.5, start=1)
