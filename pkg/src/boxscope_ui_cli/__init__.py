# Boxscope CLI package
