from updyn.symbolic import core, star
