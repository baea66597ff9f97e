# Boxscope Engine package
