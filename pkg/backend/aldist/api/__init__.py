# ALDist command line
