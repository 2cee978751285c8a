from updyn.conjugacy import henon, horseshoe, logistic
