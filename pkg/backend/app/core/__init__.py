"""
diffset toolkit - Core Module
"""
