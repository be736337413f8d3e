def process(values):
    log = []
    try:
        total = sum(values)
    finally:
        log.append("done")
    return total


amount = process([1, 2])
ratio = process([0.5])
