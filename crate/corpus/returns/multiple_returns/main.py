def classify(n):
    if n > 0:
        return "positive"
    return None


pos = classify(1)
neg = classify(-1)
