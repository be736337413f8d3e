class AppError(Exception):
    def __init__(self, code):
        super().__init__("app error")
        self.code = code


def fail(code):
    raise AppError(code)


def handle():
    try:
        fail(404)
    except AppError as err:
        caught = err.code
        return caught
    return -1


code = handle()
error = AppError(500)
