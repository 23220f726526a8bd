% Who was seen in which picture, and three ways of naming a suspect.
seen(pic1, id1, john) : [0.5, 0.7].
seen(pic1, id1, ed)   : [0.2, 0.4].
seen(pic1, id2, ed)   : [0.5, 0.6].
seen(pic1, id2, dan)  : [0.2, 0.5].

suspect1(X) : [1, 1] <-
    seen(Pic, Id1, X) : [0.5, 1],
    seen(Pic, Id2, ed) : [0.5, 1],
    Id1 != Id2.

% ig and in abbreviate igc and inc
suspect2(X) : [1, 1] <- (seen(Pic, Id1, X) &ig seen(Pic, Id2, ed)) : [0.5, 1].
suspect3(X) : [1, 1] <- (seen(Pic, Id1, X) &in seen(Pic, Id2, ed)) : [0.5, 1].
