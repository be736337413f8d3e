import pkg


def fetch(size):
    items = pkg.make_list(size)
    return items


numbers = fetch(3)
mod = pkg
