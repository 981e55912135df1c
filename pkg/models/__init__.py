"""NRP toolkit - models package"""
