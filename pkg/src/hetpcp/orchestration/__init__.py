"""스윕 오케스트레이션."""
