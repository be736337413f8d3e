def repeat(times):
    def decorate(func):
        def run():
            outputs = [func() for _ in range(times)]
            return outputs
        return run
    return decorate


@repeat(2)
def ping():
    return "pong"


replies = ping()
