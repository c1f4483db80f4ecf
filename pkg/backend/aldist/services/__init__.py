# ALDist services
