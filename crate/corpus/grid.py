width = 4
height = 3
grid = [[0 for _ in range(width)]
        for _ in range(height)]
grid[1][2] = 7
for row in grid:
    print(row)
