def risky(flag):
    if flag:
        raise ValueError("bad")
    return "fine"


def safe(flag):
    try:
        status = risky(flag)
    except ValueError:
        status = "caught"
    return status


good = safe(False)
bad = safe(True)
