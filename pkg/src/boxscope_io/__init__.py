# Boxscope I/O package
