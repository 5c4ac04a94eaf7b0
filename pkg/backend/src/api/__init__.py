"""
API Module
`mnw` command line (click) and the FastAPI service
"""
