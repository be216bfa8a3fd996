# Tests package for Flame Documentation Processing Pipeline 