def squares(nums):
    gen = (n * n for n in nums)
    return gen


result = squares([1, 2, 3])
total = sum(result)
