def accumulator():
    total = 0
    while True:
        received = yield total
        total += received


acc = accumulator()
start = next(acc)
after = acc.send(5)
