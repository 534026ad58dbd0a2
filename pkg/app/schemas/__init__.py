# Schemas modules
