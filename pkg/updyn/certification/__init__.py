from updyn.certification import (
    density,
    returns,
    sensitivity,
    systems,
    unpredictability,
)
