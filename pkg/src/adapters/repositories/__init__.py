# Artifact repository adapters package
