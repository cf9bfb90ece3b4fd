def area(w, h):
    """Rectangle area.

    Width times height.
    """
    return w * h


print(area(3, 4))
