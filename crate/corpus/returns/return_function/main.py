def chooser(flag):
    def yes():
        return True

    def no():
        return False

    if flag:
        return yes
    return no


picked = chooser(True)
answer = picked()
other = chooser(False)()
