# Torus Relations
# Verificación de factorizaciones positivas en twists de Dehn sobre toros con agujeros
