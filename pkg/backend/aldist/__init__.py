# ALDist: adaptive LASSO distributions
__version__ = "0.1.0"
