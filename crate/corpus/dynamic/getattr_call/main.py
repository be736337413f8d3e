class Greeter:
    def hello(self):
        return "hi"


def invoke(obj, name):
    method = getattr(obj, name)
    reply = method()
    return reply


said = invoke(Greeter(), "hello")
