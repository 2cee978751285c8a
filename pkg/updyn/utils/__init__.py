from updyn.utils import intervals, reports, slack
