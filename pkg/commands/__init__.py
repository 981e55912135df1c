"""NRP toolkit - command groups"""
