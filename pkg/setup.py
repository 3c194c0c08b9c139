from setuptools import setup

setup(
    name='takegrant',
    version='0.1.0',
    packages=['takegrant'],
    url='',
    license='MIT',
    author='Joseph Enders',
    author_email='',
    description='Decides whether a right can be shared in a Take-Grant protection graph.',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    python_requires='>=3.8',
    install_requires=['numpy>=1.17', 'pydantic>=2'],
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['takegrant=takegrant.cli:main']},

    classifiers=[
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: MIT License',
        'Topic :: Security',
        'Topic :: Software Development :: Libraries :: Python Modules',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: Implementation :: CPython'
    ],
)
