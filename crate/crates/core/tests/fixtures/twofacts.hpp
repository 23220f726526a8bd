a : [0, 0].
a : [1, 1].
