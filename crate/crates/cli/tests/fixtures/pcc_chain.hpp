p : [2/5, 3/5].
q : [3/10, 1/2].
r : [1, 1] <- (p &pcc q) : [3/10, 1/2].
