# Utils modules
