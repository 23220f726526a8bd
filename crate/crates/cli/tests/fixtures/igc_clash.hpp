a : [4/5, 4/5].
b : [4/5, 4/5].
(a &igc b) : [9/10, 1].
