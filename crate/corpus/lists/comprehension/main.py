def evens(limit):
    picked = [n for n in range(limit) if n % 2 == 0]
    return picked


result = evens(6)
count = len(result)
last = result[-1]
