def count_up(limit):
    current = 0
    while current < limit:
        yield current
        current += 1


gen = count_up(3)
values = list(gen)
