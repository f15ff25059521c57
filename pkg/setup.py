from setuptools import setup, find_packages

setup(
    name             = 'mangrove-sim',
    version          = '0.1.0',
    description      = 'The `mangrove` python package is a discrete event '
                       'simulator of per-actor consensus between validators, '
                       'with property checkers and a schedule explorer.',
    license          = 'MIT',
    url              = 'http://github.com/xapple/mangrove/',
    author           = 'Lucas Sinclair',
    author_email     = 'lucas.sinclair@me.com',
    packages         = find_packages(exclude=['test', 'test.*']),
    package_data     = {'mangrove': ['scenarios/*.yaml']},
    install_requires = ['plumbing==2.9.10', 'autopaths>=1.4.6', 'pandas',
                        'tabulate', 'PyYAML'],
    extras_require   = {'test': ['pytest', 'mock']},
    entry_points     = {'console_scripts':
                        ['mangrove-sim = mangrove.run_mangrove:main']},
    long_description = open('README.md').read(),
    long_description_content_type = 'text/markdown',
    include_package_data = True,
)
