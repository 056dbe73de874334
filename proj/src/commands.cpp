namespace modal {}
